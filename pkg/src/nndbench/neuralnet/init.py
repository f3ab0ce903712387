import numpy as np


def fans(shape):
    """(fan_in, fan_out) of a weight array.

    2-D (n_in, n_out) dense or LSTM matrices use the dimensions directly;
    3-D (kernel, c_in, c_out) convolution kernels multiply by the kernel size.
    """
    if len(shape) == 2:
        return shape[0], shape[1]
    if len(shape) == 3:
        k, cin, cout = shape
        return k * cin, k * cout
    raise ValueError(f"cannot derive fan-in/fan-out from shape {shape}")


def xavier_bound(shape):
    fan_in, fan_out = fans(shape)
    return np.sqrt(6.0 / (fan_in + fan_out))


def xavier_init(shape, rng, dtype=np.float32):
    """Glorot-uniform weights on [-sqrt(6 / (fan_in + fan_out)), +sqrt(...)]."""
    bound = xavier_bound(shape)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)
