def percent(part: int, total: int) -> int:
    if total == 0:
        return 0
    return (part * 100) // total
