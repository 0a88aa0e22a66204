def min2(a: int, b: int) -> int:
    return a if a <= b else b
