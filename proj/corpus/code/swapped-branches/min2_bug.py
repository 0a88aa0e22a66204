def min2(a: int, b: int) -> int:
    return b if a <= b else a
