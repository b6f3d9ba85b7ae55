"""Fixed points of modalized formulas in the logics wGL_n.

Thin package wrapper around the compiled extension module. Everything public
lives in the extension; see ``help(wglfix._wglfix)`` for the full surface.
"""

try:
    # Installed layout: the extension sits inside this package.
    from ._wglfix import *  # noqa: F401,F403
except ImportError:
    # In-tree layout: the extension is importable from the build directory.
    from _wglfix import *  # noqa: F401,F403

__all__ = [
    "Formula",
    "FixedPointResult",
    "parse",
    "to_text",
    "simplify",
    "substitute",
    "atoms",
    "dep",
    "dep_mod",
    "is_modalized",
    "box_power",
    "boxdot",
    "iterate",
    "fixed_point",
    "simple_fixed_point",
    "check_certificate",
    "countermodel",
]
