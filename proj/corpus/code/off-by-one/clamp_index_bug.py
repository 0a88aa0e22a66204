def clamp_index(i: int, n: int) -> int:
    if i < 0:
        return 0
    if i > n:
        return n - 1
    return i
