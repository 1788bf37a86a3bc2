"""Probabilistic normed spaces: distribution functions, t-norms, triangle
functions, m-transforms, products and strong-topology neighborhoods, with
randomized verification campaigns."""

from .ddf import DDF, AnalyticDDF, Grid, expc, ratio, step
from .report import VerificationReport
from .tnorm import M, PI, W, M_STAR, PI_STAR, W_STAR, TNorm, make_tg, parse_tnorm
from .trifn import TriangleFunction, lift_of, lift_star, parse_trifn, tau, tau_star
from .transform import MbFunction, blowup, m_transform, parse_m, power
from .spaces import PNSpace, alpha_simple, equilateral, exp_norm, simple, verify_axioms
from .products import countable_product, sigma_product, tau_product, tg_product

__version__ = "0.1.0"
