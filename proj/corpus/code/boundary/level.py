def level(x: int) -> int:
    return x // 5
