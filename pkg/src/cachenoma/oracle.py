"""Brute-force decodability checker for the CIC-then-SIC receivers.

Knows nothing about the closed-form regions: it walks every admissible
decoding sequence at each UE and tests each step against the capacity left
after the signals decoded so far have been subtracted.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import List, Sequence, Tuple

import numpy as np

from .model import OWN_SIGNALS, RESIDUAL_SIGNALS, SIGNAL_INDEX, SIGNAL_NAMES, ChannelState

RATE_TOL = 1e-12


@dataclass(frozen=True)
class DecodeAttempt:
    """One decoding sequence at a UE.

    A step is a signal index or a pair of the UE's own signal indices decoded
    jointly.  The interfering signal is either placed somewhere in the
    sequence or left undecoded; steps after the last own signal are dropped
    because they cannot change the outcome.
    """

    user: str
    steps: Tuple[object, ...]

    def __str__(self):
        names = []
        for s in self.steps:
            if isinstance(s, tuple):
                names.append("(" + ", ".join(SIGNAL_NAMES[k] for k in s) + ")")
            else:
                names.append(SIGNAL_NAMES[s])
        return f"UE {self.user}: " + " -> ".join(names)


def enumerate_orders(user: str) -> List[DecodeAttempt]:
    own = OWN_SIGNALS[user]
    other = [k for k in RESIDUAL_SIGNALS[user] if k not in own][0]
    units = [[(own[0],), (own[1],)], [(own[0], own[1])]]
    attempts = []
    for own_steps in units:
        if len(own_steps) == 2:
            seqs = [tuple(s) for s in permutations(own_steps)]
        else:
            seqs = [tuple(own_steps)]
        for seq in seqs:
            flat = [s[0] if len(s) == 1 else s for s in seq]
            # interferer decoded before own step `pos`, or never
            for pos in range(len(flat) + 1):
                if pos == len(flat):
                    steps = tuple(flat)
                else:
                    steps = tuple(flat[:pos]) + (other,) + tuple(flat[pos:])
                attempts.append(DecodeAttempt(user, steps))
    return attempts


_ATTEMPTS = {u: enumerate_orders(u) for u in ("i", "j")}


def _step_slack(att: DecodeAttempt, r: np.ndarray, p: np.ndarray, alpha: float) -> float:
    """Smallest ``capacity - rate`` over the attempt's steps (>= 0 means it decodes)."""
    remaining = set(RESIDUAL_SIGNALS[att.user])
    own_left = set(OWN_SIGNALS[att.user])
    worst = np.inf
    for step in att.steps:
        sig = step if isinstance(step, tuple) else (step,)
        interference = sum(p[k] for k in remaining if k not in sig)
        noise = interference + alpha
        for k in sig:
            worst = min(worst, np.log2(1.0 + p[k] / noise) - r[k])
        if len(sig) == 2:
            cap = np.log2(1.0 + (p[sig[0]] + p[sig[1]]) / noise)
            worst = min(worst, cap - r[sig[0]] - r[sig[1]])
        remaining.difference_update(sig)
        own_left.difference_update(sig)
        if not own_left:
            break
    return float(worst)


def attempt_decodes(att: DecodeAttempt, r: Sequence[float], p: Sequence[float],
                    ch: ChannelState) -> bool:
    """Rate-based test: a codeword decodes iff its rate does not exceed the current capacity."""
    return _step_slack(att, np.asarray(r, float), np.asarray(p, float), ch.alpha(att.user)) >= -RATE_TOL


def user_margin(user: str, r, p, ch: ChannelState) -> float:
    r = np.asarray(r, float)
    p = np.asarray(p, float)
    alpha = ch.alpha(user)
    return max(_step_slack(a, r, p, alpha) for a in _ATTEMPTS[user])


def oracle_margin(r, p, ch: ChannelState) -> float:
    """Positive inside the oracle region, negative outside; zero on its boundary."""
    return min(user_margin("i", r, p, ch), user_margin("j", r, p, ch))


def oracle_achievable(r: Sequence[float], p: Sequence[float], ch: ChannelState) -> bool:
    # the two UEs decode independently; interferer rates come from r itself
    return oracle_margin(r, p, ch) >= -RATE_TOL


def successful_attempts(r, p, ch: ChannelState) -> Tuple[List[DecodeAttempt], List[DecodeAttempt]]:
    ok_i = [a for a in _ATTEMPTS["i"] if attempt_decodes(a, r, p, ch)]
    ok_j = [a for a in _ATTEMPTS["j"] if attempt_decodes(a, r, p, ch)]
    return ok_i, ok_j


def attempt_from_names(user: str, steps) -> DecodeAttempt:
    """Build an attempt from names such as ``["B2", ("A1", "A2")]``."""
    conv = []
    for s in steps:
        if isinstance(s, str):
            conv.append(SIGNAL_INDEX[s])
        else:
            conv.append(tuple(SIGNAL_INDEX[x] for x in s))
    return DecodeAttempt(user, tuple(conv))


def cross_first_pair_feasible(p: Sequence[float], ch: ChannelState) -> bool:
    """SINR conditions for UE j to strip x_A2 first while UE i strips x_B2 first.

    UE j must see x_A2 more strongly than UE i does once x_A2's partner x_A1
    is out of the way, and symmetrically for x_B2; both strict.
    """
    p_i1, p_i2, p_j1, p_j2 = (float(v) for v in p)
    a_i, a_j = ch.alpha_i, ch.alpha_j
    if p_i2 <= 0 or p_j2 <= 0:
        return False
    a2_at_j_first = p_i2 / (p_j1 + p_j2 + a_j) > p_i2 / (p_i1 + a_i)
    b2_at_i_first = p_j2 / (p_i1 + p_i2 + a_i) > p_j2 / (p_j1 + a_j)
    return a2_at_j_first and b2_at_i_first
