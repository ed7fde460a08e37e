"""Acceptance suite: one test per shipped guarantee, each printing a
[PASS]/[FAIL] line with the measured numbers.

All randomized checks run under fixed seeds, so results are reproducible.
Run `pytest tests/test_acceptance.py -v -s` to watch the lines print; the
whole suite signs a few hundred images and takes on the order of a minute.
"""

import hashlib
import math

import numpy as np
import pytest

from fpauth import core
from fpauth.attacks import AttackSpec, apply_attack
from fpauth.authenticate import (
    generate,
    phase_field,
    predicted_detection_probability,
    psnr,
    single_tamper_detected,
    verify,
)
from fpauth.keyschedule import (
    MODE_BACKWARD,
    MODE_FORWARD,
    LcgParams,
    expand_key,
    key_space_size,
    lcg_next,
    random_key,
)

UB_SWEEP = (0.52, 0.6, 0.7, 0.85, 1.0)

# Frozen during the build from two independent processes; any platform or
# code drift in key expansion shows up as a digest mismatch here.
EXPAND_DIGEST = "3460327a5ebc105e420f491cdfccbbb3181ac044a3e7c466e28502415f87118b"

# Census-predicted flagged fraction for a foreign-key rewrite at ub_h 0.52,
# derived from the criterion-6 census oracle before the build (see the
# rewrite test, which recomputes it from scratch).
REWRITE_EXPECTED = 0.118


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def random_image(seed, shape=(64, 64)):
    return np.random.default_rng(seed).integers(0, 256, shape, dtype=np.uint8)


@pytest.fixture(scope="module")
def signed_pairs():
    """100 random 64x64 images signed under random keys covering both scan
    modes and amplitude bounds 0.52 / 0.7 / 1.0."""
    pairs = []
    for i in range(100):
        img = random_image(1000 + i)
        key = random_key(2000 + i,
                         mode=(MODE_FORWARD, MODE_BACKWARD)[i % 2],
                         ub_h=(0.52, 0.7, 1.0)[i % 3])
        pairs.append((img, key, generate(img, key)))
    return pairs


@pytest.fixture(scope="module")
def corpus_psnrs(natural_corpus):
    """PSNR of every natural corpus image signed at a given amplitude
    bound, computed once per bound and cached across criteria."""
    cache = {}

    def get(ub):
        if ub not in cache:
            field = expand_key(random_key(31, ub_h=ub), 256, 256)
            cache[ub] = [psnr(img, generate(img, field))
                         for img in natural_corpus]
        return cache[ub]

    return get


def test_acceptance_unit_amplitude_census():
    direct = sum(1 for x in range(256) if abs(math.cos(x)) < 0.5)
    vector = int(np.count_nonzero(np.abs(np.cos(np.arange(256.0))) < 0.5))
    library = core.count_feasible(core.PixelParams(1.0, (0.0,) * 12),
                                  core.NeighborVector())
    ok = direct == vector == library == 86
    report("unit-amplitude census", ok,
           f"|cos x| < 0.5 holds for {library}/256 values (expect 86)")


def test_acceptance_generation_soundness(signed_pairs):
    dirty = sum(1 for _img, key, signed in signed_pairs
                if verify(signed, key).any())
    # Spot-check the vectorized verdict against the scalar predicate.
    scalar_ok = True
    for img, key, signed in signed_pairs[:3]:
        field = expand_key(key, *img.shape)
        for s in range(1, 65, 13):
            for t in range(1, 65, 13):
                env = core.NeighborVector.from_image(signed, s, t)
                p = field.pixel_params(s, t)
                scalar_ok &= core.is_fixed_point(
                    int(signed[s - 1, t - 1]), p, env)
    ok = dirty == 0 and scalar_ok
    report("generation soundness", ok,
           f"{100 - dirty}/100 signed images verify clean, "
           f"scalar spot-check {'agrees' if scalar_ok else 'disagrees'}")


def test_acceptance_distortion_bound(signed_pairs):
    worst_interior = 0
    worst_clamped = 0
    for img, _key, signed in signed_pairs:
        diff = np.abs(signed.astype(int) - img.astype(int))
        clamped = (img < 3) | (img > 252)
        if (~clamped).any():
            worst_interior = max(worst_interior, int(diff[~clamped].max()))
        if clamped.any():
            worst_clamped = max(worst_clamped, int(diff[clamped].max()))
    ok = worst_interior <= 3 and worst_clamped <= 6
    report("distortion bound", ok,
           f"max |J-I| = {worst_interior} interior (limit 3), "
           f"{worst_clamped} border-clamped (limit 6)")


def test_acceptance_transparency(corpus_psnrs):
    low = corpus_psnrs(0.52)
    mid = corpus_psnrs(0.7)
    ok_mid = min(mid) > 51.0
    ok_low = all(53.0 <= v <= 62.0 for v in low)
    report("transparency", ok_mid and ok_low,
           f"20 natural images: min PSNR {min(mid):.2f} dB at ub 0.7 "
           f"(need > 51); range [{min(low):.2f}, {max(low):.2f}] dB at "
           f"ub 0.52 (need within [53, 62])")


def test_acceptance_localization():
    img = random_image(77)
    key = random_key(78, mode=MODE_FORWARD, ub_h=0.7)
    field = expand_key(key, 64, 64)
    signed = generate(img, field)
    allowed = {(0, 0), (0, 1), (1, -1), (1, 0), (1, 1)}  # self, E, SW, S, SE
    rng = np.random.default_rng(79)
    violations = 0
    worst_distance = 0
    for _ in range(1000):
        r = int(rng.integers(2, 62))
        c = int(rng.integers(2, 62))
        value = int(rng.integers(0, 255))
        if value >= signed[r, c]:
            value += 1
        tampered = signed.copy()
        tampered[r, c] = value
        for fr, fc in np.argwhere(verify(tampered, field)):
            off = (int(fr) - r, int(fc) - c)
            worst_distance = max(worst_distance, max(abs(off[0]), abs(off[1])))
            if off not in allowed:
                violations += 1
    ok = violations == 0
    report("localization", ok,
           f"1000 single-pixel tampers: {violations} flags outside "
           f"{{self, E, SW, S, SE}}, max Chebyshev distance {worst_distance}")


def test_acceptance_fragility_oracle():
    details = []
    ok = True
    for ub, seed in ((0.52, 80), (1.0, 81)):
        img = random_image(seed)
        field = expand_key(random_key(seed + 1, ub_h=ub), 64, 64)
        signed = generate(img, field)
        rng = np.random.default_rng(seed + 2)
        trials = 1000
        hits = 0
        predictions = []
        for _ in range(trials):
            s = int(rng.integers(3, 63))
            t = int(rng.integers(3, 63))
            value = int(rng.integers(0, 255))
            if value >= signed[s - 1, t - 1]:
                value += 1
            hits += single_tamper_detected(signed, field, (s, t), value)
            predictions.append(
                predicted_detection_probability(signed, field, (s, t)))
        empirical = hits / trials
        predicted = float(np.mean(predictions))
        se = math.sqrt(predicted * (1.0 - predicted) / trials)
        ok &= abs(empirical - predicted) <= 3.0 * se
        details.append(f"ub {ub}: empirical {empirical:.4f} vs predicted "
                       f"{predicted:.4f} (3 SE = {3 * se:.4f})")
    report("fragility oracle", ok, "; ".join(details))


def test_acceptance_collage_hollowness():
    key = random_key(85, ub_h=0.52)
    field = expand_key(key, 64, 64)
    first = generate(random_image(86), field)
    second = generate(random_image(87), field)
    attacked = first.copy()
    attacked[16:48, 16:48] = second[16:48, 16:48]
    flags = np.argwhere(verify(attacked, field))
    deep_interior = sum(1 for r, c in flags
                        if 18 <= r <= 45 and 18 <= c <= 45)
    far_outside = sum(1 for r, c in flags
                      if not (15 <= r <= 48 and 15 <= c <= 48))
    ok = len(flags) > 0 and deep_interior == 0 and far_outside == 0
    report("collage hollowness", ok,
           f"32x32 paste between same-key images: {len(flags)} boundary "
           f"flags, {deep_interior} at interior depth >= 2, "
           f"{far_outside} beyond boundary distance 1")


def test_acceptance_foreign_key_rewrite():
    img = random_image(90, (128, 128))
    true_key = random_key(91, ub_h=0.52)
    attacker_key = random_key(92, ub_h=0.52)
    field = expand_key(true_key, 128, 128)
    signed = generate(img, field)
    spec = AttackSpec("rewrite", (0, 0, 1, 1), {"key": attacker_key})
    rewritten = apply_attack(signed, spec, aux=img)
    fraction = float(verify(rewritten, field).mean())

    # Census oracle: per-pixel rejection chance of a value unrelated to the
    # true key, averaged over the frame.
    phi = phase_field(rewritten, field)
    grid = np.abs(field.h[None, :, :] *
                  np.cos(np.arange(256.0)[:, None, None] + phi[None, :, :]))
    expected = float(1.0 - (grid < 0.5).mean())
    ok = (fraction >= 0.10 and abs(fraction - expected) <= 0.03
          and abs(expected - REWRITE_EXPECTED) <= 0.02)
    report("foreign-key rewrite", ok,
           f"flagged fraction {fraction:.4f} (need >= 0.10), census "
           f"expectation {expected:.4f} (frozen {REWRITE_EXPECTED})")


def test_acceptance_key_schedule():
    import random as pyrandom

    rng = pyrandom.Random(99)
    mismatches = 0
    for _ in range(50):
        m = rng.randint(8, 31)
        p = LcgParams(rng.randint(1, 2 ** m - 1), rng.randint(1, 10 ** 6),
                      rng.randint(1, 10 ** 6), m)
        x_impl = p.x0
        x_oracle = p.x0
        for _ in range(1000):
            x_impl = lcg_next(x_impl, p)
            x_oracle = ((4 * p.a + 1) * x_oracle + 2 * p.b + 1) % 2 ** p.m
            if x_impl != x_oracle:
                mismatches += 1
                break

    field = expand_key(random_key(123), 32, 32)
    digest = hashlib.sha256(field.h.tobytes() + field.k.tobytes()).hexdigest()
    again = expand_key(random_key(123), 32, 32)
    rerun_equal = (np.array_equal(field.h, again.h)
                   and np.array_equal(field.k, again.k))

    space_ok = key_space_size((10, 50)) == 41 ** 36 > 2 ** 192
    ok = (mismatches == 0 and digest == EXPAND_DIGEST and rerun_equal
          and space_ok)
    report("key schedule", ok,
           f"50 streams x 1000 steps: {mismatches} oracle mismatches; "
           f"expansion digest {'matches' if digest == EXPAND_DIGEST else 'DRIFTED'}; "
           f"41^36 > 2^192 is {space_ok}")


def test_acceptance_monotone_tradeoff(corpus_psnrs):
    rng = np.random.default_rng(60)
    census_ok = True
    for _ in range(20):
        phi = float(rng.uniform(0, 2 * math.pi))
        counts = [sum(1 for x in range(256)
                      if abs(h * math.cos(x + phi)) < 0.5)
                  for h in np.linspace(0.501, 1.0, 26)]
        census_ok &= all(a >= b for a, b in zip(counts, counts[1:]))

    means = [float(np.mean(corpus_psnrs(ub))) for ub in UB_SWEEP]
    psnr_ok = all(a > b for a, b in zip(means, means[1:]))
    ok = census_ok and psnr_ok
    sweep = ", ".join(f"{ub}:{m:.2f}" for ub, m in zip(UB_SWEEP, means))
    report("monotone trade-off", ok,
           f"census non-increasing in h over 20 phases: {census_ok}; "
           f"mean PSNR strictly decreasing over sweep ({sweep} dB)")
