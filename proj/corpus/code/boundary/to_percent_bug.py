def to_percent(x: int) -> int:
    if x > 100:
        return 100
    return x
