"""Monte Carlo rollouts of e-state policies."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from ..translate.xmdp import XMDP


@dataclass
class Rollout:
    states: list[int] = field(default_factory=list)
    estates: list = field(default_factory=list)
    actions: list[str] = field(default_factory=list)
    reward: float = 0.0  # discounted reward collected


class _XmdpView:
    def __init__(self, m: XMDP):
        self.m = m

    def initial(self):
        return self.m.start

    def successors(self, e, a):
        return self.m.trans[e][a]

    def reward(self, e):
        return self.m.reward[e]

    def state(self, e):
        return self.m.state[e]


def simulate_policy(model, policy, steps: int, seed: int = 0,
                    discount: float | None = None, rng: random.Random | None = None) -> Rollout:
    """One rollout of ``steps`` transitions from the start e-state.

    ``model`` is an :class:`XMDP` (then ``policy`` is indexed by e-state
    number) or an e-state generator (then ``policy`` maps keys to actions).
    The reward of stage ``t`` is weighted by ``discount ** t``; with
    ``steps=0`` the result is the reward of the start e-state.
    """
    view = _XmdpView(model) if isinstance(model, XMDP) else model
    if discount is None:
        discount = model.discount if isinstance(model, XMDP) else model.d.discount
    rng = rng or random.Random(seed)
    e = view.initial()
    out = Rollout([view.state(e)], [e], [], view.reward(e))
    weight = 1.0
    for _ in range(steps):
        try:
            a = policy[e]
        except (KeyError, IndexError):
            raise KeyError(f"policy has no action for e-state {e!r}") from None
        dist = view.successors(e, a)
        u = rng.random()
        acc = 0.0
        for e2, p in dist:
            acc += p
            if u < acc:
                break
        e = e2  # rounding can leave u just above the final sum; take the last outcome
        weight *= discount
        out.actions.append(a)
        out.states.append(view.state(e))
        out.estates.append(e)
        out.reward += weight * view.reward(e)
    return out


def estimate_value(model, policy, rollouts: int, steps: int, seed: int = 0,
                   discount: float | None = None) -> tuple[float, float]:
    """Mean discounted return over ``rollouts`` runs and its standard error."""
    rng = random.Random(seed)
    xs = [simulate_policy(model, policy, steps, discount=discount, rng=rng).reward
          for _ in range(rollouts)]
    mean = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
    return mean, math.sqrt(var / len(xs))
