def wrap_index(i: int, n: int) -> int:
    if i < 0:
        return i + n
    return i
