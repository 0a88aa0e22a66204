def to_kelvin(celsius: int) -> int:
    return celsius + 273
