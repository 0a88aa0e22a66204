def to_percent(x: int) -> int:
    if x > 100:
        return 100
    if x < 0:
        return 0
    return x
