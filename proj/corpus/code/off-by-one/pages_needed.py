def pages_needed(items: int) -> int:
    if items == 0:
        return 0
    return (items - 1) // 10 + 1
