def double(x: int) -> int:
    return x + x
