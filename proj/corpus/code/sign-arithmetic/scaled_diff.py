def scaled_diff(x: int) -> int:
    t = 3 * x
    t = t - x
    return t
