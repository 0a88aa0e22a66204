def bucket(key: int, buckets: int) -> int:
    return key % buckets
