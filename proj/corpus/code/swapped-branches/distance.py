def distance(a: int, b: int) -> int:
    if a >= b:
        d = a - b
    else:
        d = b - a
    return d
