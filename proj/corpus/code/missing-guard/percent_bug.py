def percent(part: int, total: int) -> int:
    return (part * 100) // total
