import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# The sandbox can be slow; property tests should never flake on wall time.
settings.register_profile(
    "package",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("package")


def _to_gray(img: np.ndarray) -> np.ndarray:
    if img.ndim == 2:
        return img.astype(np.uint8)
    luma = (0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2])
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def natural_images(count: int = 20, size: int = 256) -> list:
    """Deterministic grayscale crops from the scikit-image sample photos.

    Uses corner crops so every call returns the same pixel data; sources
    span more than ten distinct photographs.
    """
    from skimage import data

    sources = [
        data.camera(), data.moon(), data.coins(), data.astronaut(),
        data.immunohistochemistry(), data.coffee(), data.rocket(),
        data.hubble_deep_field(), data.cell(), data.brick(),
        data.grass(), data.gravel(), data.chelsea(), data.cat(),
        data.clock(),
    ]
    crops = []
    for src in sources:
        gray = _to_gray(np.asarray(src))
        h, w = gray.shape
        if h < size or w < size:
            continue
        # At most two crops per photo keeps the corpus spread across sources.
        for r, c in dict.fromkeys([(0, 0), (h - size, w - size)]):
            crops.append(gray[r:r + size, c:c + size].copy())
        if len(crops) >= count:
            break
    if len(crops) < count:
        raise RuntimeError(f"only {len(crops)} usable crops available")
    return crops[:count]


@pytest.fixture(scope="session")
def natural_corpus():
    return natural_images(20, 256)
