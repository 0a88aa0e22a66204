def ceil_div4(a: int) -> int:
    return (a + 4) // 4
