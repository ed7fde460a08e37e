"""Keyed fixed point images: fragile authentication for 8-bit grayscale
images with pixel-level tamper localization.

Signing nudges every pixel by at most a few gray levels until it is a fixed
point of a keyed per-pixel map; verification re-checks the fixed-point
predicate and flags every pixel where it fails, which pins tampering down
to the pixel and its immediate causal dependents.
"""

from .attacks import (
    ATTACK_KINDS,
    AttackSpec,
    BatteryReport,
    apply_attack,
    attack_battery,
    parse_layout,
)
from .authenticate import (
    generate,
    phase_field,
    predicted_detection_probability,
    psnr,
    single_tamper_detected,
    tamper_dependents,
    verify,
)
from .core import (
    NeighborVector,
    NoFixedPointError,
    PixelParams,
    count_feasible,
    f_apply,
    is_fixed_point,
    phase,
    round_r,
    solve_pixel,
)
from .estimator import FixedPointAuthenticator
from .imageio import (
    ImageFormatError,
    overlay_mask,
    read_image,
    read_mask,
    write_image,
    write_mask,
)
from .keyschedule import (
    MODE_BACKWARD,
    MODE_FORWARD,
    AuthKey,
    KeyFormatError,
    LcgParams,
    ParamField,
    expand_key,
    key_space_size,
    lcg_next,
    load_key,
    parse_key,
    random_key,
    save_key,
    write_key,
)

__version__ = "0.1.0"

__all__ = [
    "ATTACK_KINDS",
    "AttackSpec",
    "AuthKey",
    "BatteryReport",
    "FixedPointAuthenticator",
    "ImageFormatError",
    "KeyFormatError",
    "LcgParams",
    "MODE_BACKWARD",
    "MODE_FORWARD",
    "NeighborVector",
    "NoFixedPointError",
    "ParamField",
    "PixelParams",
    "apply_attack",
    "attack_battery",
    "count_feasible",
    "expand_key",
    "f_apply",
    "generate",
    "is_fixed_point",
    "key_space_size",
    "lcg_next",
    "load_key",
    "overlay_mask",
    "parse_key",
    "parse_layout",
    "phase",
    "phase_field",
    "predicted_detection_probability",
    "psnr",
    "random_key",
    "read_image",
    "read_mask",
    "round_r",
    "save_key",
    "single_tamper_detected",
    "solve_pixel",
    "tamper_dependents",
    "verify",
    "write_image",
    "write_key",
    "write_mask",
]
