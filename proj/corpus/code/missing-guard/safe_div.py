def safe_div(n: int, d: int) -> int:
    if d == 0:
        return 0
    return n // d
