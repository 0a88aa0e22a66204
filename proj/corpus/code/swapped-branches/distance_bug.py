def distance(a: int, b: int) -> int:
    if a >= b:
        d = b - a
    else:
        d = a - b
    return d
