def count_between(lo: int, hi: int) -> int:
    # inclusive range
    if hi < lo:
        return 0
    return hi - lo + 1
