def count_between(lo: int, hi: int) -> int:
    if hi < lo:
        return 0
    return hi - lo
