import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cachenoma.model import (
    CacheCase,
    CacheConfig,
    ChannelState,
    DegenerateChannelError,
    UnsupportedCaseError,
    capacity,
    check_power,
    classify_cache_case,
    dbm_to_watt,
    effective_noise,
    offload_load,
    split_files,
    watt_to_dbm,
)

V = 4e9
frac = st.floats(0.0, 1.0)


def test_capacity_values():
    assert capacity(0) == 0.0
    assert capacity(1) == 1.0
    assert capacity(10 / 1e-3) == pytest.approx(13.288, abs=1e-3)
    np.testing.assert_allclose(capacity(np.array([0.0, 3.0])), [0.0, 2.0])


def test_capacity_rejects_negative_sinr():
    with pytest.raises(ValueError):
        capacity(-0.1)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_capacity_monotone(a, b):
    lo, hi = sorted((a, b))
    assert capacity(lo) <= capacity(hi)


def test_classify_cases():
    assert classify_cache_case(CacheConfig(0.2, 0.8, 0.8, 0.2, V, V)) is CacheCase.I
    assert classify_cache_case(CacheConfig(0.8, 0.8, 0.2, 0.2, V, V)) is CacheCase.II
    assert classify_cache_case(CacheConfig(0.2, 0.2, 0.8, 0.8, V, V)) is CacheCase.III
    assert classify_cache_case(CacheConfig(0.8, 0.2, 0.2, 0.8, V, V)) is CacheCase.IV
    assert classify_cache_case(CacheConfig(0.5, 0.5, 0.5, 0.5, V, V)) is CacheCase.I


def test_split_default_config():
    load = split_files(CacheConfig(0.2, 0.8, 0.8, 0.2, V, V))
    assert load.beta_i1 == pytest.approx(2.4e9)
    assert load.beta_i2 == pytest.approx(0.8e9)
    assert load.beta_j1 == pytest.approx(2.4e9)
    assert load.beta_j2 == pytest.approx(0.8e9)


def test_split_uncached_and_fully_cached():
    load = split_files(CacheConfig(0, 0, 0, 0, V, V))
    assert (load.beta_i1, load.beta_i2) == (0.0, V)
    full = split_files(CacheConfig(1, 1, 1, 1, V, V))
    assert full.beta_i1 == full.beta_i2 == 0.0


def test_split_rejects_other_cases():
    with pytest.raises(UnsupportedCaseError):
        split_files(CacheConfig(0.8, 0.8, 0.2, 0.2, V, V))


@given(frac, frac, frac, frac)
def test_split_conserves_uncached_bits(c_ia, c_ib, c_ja, c_jb):
    cfg = CacheConfig(c_ia, c_ib, c_ja, c_jb, V, V)
    if classify_cache_case(cfg) is not CacheCase.I:
        return
    load = split_files(cfg)
    assert min(load) >= 0
    # whatever UE i misses from its own cache is delivered, split two ways
    assert load.user_total("i") == pytest.approx((1 - c_ia) * V, rel=1e-12, abs=1e-3)
    assert load.user_total("j") == pytest.approx((1 - c_jb) * V, rel=1e-12, abs=1e-3)
    assert offload_load(cfg) == pytest.approx((load.user_total("i"), load.user_total("j")))


def test_swap_maps_case_one_to_itself():
    cfg = CacheConfig(0.1, 0.7, 0.9, 0.3, 3e9, 5e9)
    sw = cfg.swapped()
    assert classify_cache_case(sw) is CacheCase.I
    assert sw.swapped() == cfg
    a, b = split_files(cfg), split_files(sw)
    assert (a.beta_i1, a.beta_i2) == pytest.approx((b.beta_j1, b.beta_j2))


def test_cache_capacity_check():
    CacheConfig(0.5, 0.5, 0.5, 0.5, V, V, cache_capacity_bits=(V, V))
    with pytest.raises(ValueError):
        CacheConfig(0.6, 0.5, 0.5, 0.5, V, V, cache_capacity_bits=(V, V))
    with pytest.raises(ValueError):
        CacheConfig(1.2, 0, 0, 0, V, V)


def test_effective_noise():
    assert effective_noise(1.0, 1e-3) == pytest.approx(1e-3)
    assert effective_noise(1e-14, 1e-14) == pytest.approx(1.0)
    assert effective_noise(2.0, 1e-2) == pytest.approx(5e-3)
    with pytest.raises(DegenerateChannelError):
        effective_noise(0.0, 1.0)


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelState(1e-2, 1e-3, 1.0)
    with pytest.raises(ValueError):
        ChannelState(1e-2, 1e-2, 1.0)
    with pytest.raises(ValueError):
        ChannelState(1e-3, 1e-2, 0.0)
    assert ChannelState(1e-3, 1e-2, 1.0).alpha_gap == pytest.approx(9e-3)


def test_check_power():
    ch = ChannelState(0.1, 1.0, 2.0)
    check_power([0.5, 0.5, 0.5, 0.5], ch)
    with pytest.raises(ValueError):
        check_power([1.0, 1.0, 0.5, 0.0], ch)
    with pytest.raises(ValueError):
        check_power([-0.1, 0, 0, 0], ch)


def test_unit_conversions():
    assert dbm_to_watt(35) == pytest.approx(3.16227766)
    noise_dbm = -172.6 + 10 * math.log10(5e6)
    assert noise_dbm == pytest.approx(-105.61, abs=5e-3)
    assert watt_to_dbm(dbm_to_watt(noise_dbm)) == pytest.approx(noise_dbm)
