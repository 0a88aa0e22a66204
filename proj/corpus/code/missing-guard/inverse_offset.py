def inverse_offset(x: int) -> int:
    if x == 3:
        return 0
    return 100 // (x - 3)
