def net(gain: int, loss: int) -> int:
    return gain - loss
