def pages_needed(items: int) -> int:
    return items // 10 + 1
