def clamp(x: int, lo: int, hi: int) -> int:
    return min(max(x, lo), hi)
