def safe_div(n: int, d: int) -> int:
    return n // d
