"""Scikit-learn style front end.

FixedPointAuthenticator wraps the signing and verification routines in the
estimator protocol: fit() resolves the key, transform() signs an image,
predict() returns the tamper mask, and score() the fraction of clean
pixels.  Parameters are stored verbatim so get_params/set_params/clone work
as usual and the estimator composes with sklearn pipelines.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .authenticate import generate, psnr, verify
from .keyschedule import MODE_FORWARD, AuthKey, load_key, random_key

__all__ = ["FixedPointAuthenticator"]


class FixedPointAuthenticator(TransformerMixin, BaseEstimator):
    """Sign and verify 8-bit grayscale images with a secret key.

    Parameters
    ----------
    key : AuthKey, path to a key file, or None
        Secret key.  None draws one deterministically from the remaining
        parameters at fit time.
    seed : int
        Seed for key generation when `key` is None.
    mode : str
        Scan mode for a generated key: "causal-forward" or "causal-backward".
    ub_h : float
        Residual amplitude upper bound in (0.5, 1] for a generated key.
        Smaller values distort less; larger values detect more.
    param_range : tuple of (int, int)
        Inclusive range the generated key's quadruple entries are drawn from.

    Attributes
    ----------
    key_ : AuthKey
        The resolved key after fit().
    """

    def __init__(self, key=None, seed=0, mode=MODE_FORWARD, ub_h=0.52,
                 param_range=(10, 90)):
        self.key = key
        self.seed = seed
        self.mode = mode
        self.ub_h = ub_h
        self.param_range = param_range

    def fit(self, X=None, y=None):
        """Resolve the key; X is accepted for pipeline compatibility."""
        if self.key is None:
            self.key_ = random_key(self.seed, mode=self.mode, ub_h=self.ub_h,
                                   param_range=tuple(self.param_range))
        elif isinstance(self.key, AuthKey):
            self.key_ = self.key
        else:
            self.key_ = load_key(self.key)
        return self

    def transform(self, X):
        """Sign: return the fixed point image of X under the fitted key."""
        check_is_fitted(self)
        return generate(X, self.key_)

    def predict(self, X):
        """Verify: boolean tamper mask, True where the predicate fails."""
        check_is_fitted(self)
        return verify(X, self.key_)

    def score(self, X, y=None) -> float:
        """Fraction of pixels passing verification (1.0 means authentic)."""
        mask = self.predict(X)
        return 1.0 - float(mask.mean())

    def psnr(self, X) -> float:
        """Distortion the signature would introduce on X, in dB."""
        return psnr(X, self.transform(X))
