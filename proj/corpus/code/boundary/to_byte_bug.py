def to_byte(x: int) -> int:
    return x % 257
