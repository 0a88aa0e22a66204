def max2(a: int, b: int) -> int:
    if a >= b:
        return b
    return a
