from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


class Adam:
    """Adam with bias-corrected moment estimates.

    Moment buffers are created lazily on the first step, one pair per model
    parameter in declaration order. ``t`` counts completed steps.
    """

    def __init__(self, config=None):
        self.config = config or AdamConfig()
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params, grads):
        cfg = self.config
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - cfg.beta1 ** self.t
        c2 = 1.0 - cfg.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * (g * g)
            p -= (cfg.learning_rate / c1) * m / (np.sqrt(v / c2) + cfg.epsilon)

    def state_arrays(self):
        if self.m is None:
            return []
        return list(self.m) + list(self.v)

    def load_state(self, t, arrays):
        self.t = int(t)
        if not arrays:
            self.m = self.v = None
            return
        half = len(arrays) // 2
        self.m = [np.array(a) for a in arrays[:half]]
        self.v = [np.array(a) for a in arrays[half:]]
