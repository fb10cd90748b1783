"""Numerical toolkit for explicit symplectic embeddings.

The heavy lifting lives in the C++ core (see the repository README); this
package exposes the main operations: domains with sampling and measure, the
smooth-map algebra, the Guth and Hind-Kerman embedding constructions, the
Knothe/Moser transports, and the certification checks.
"""

from ._symplembed import (  # noqa: F401
    Domain,
    GuthFrame,
    HkBundle,
    HkConstants,
    RadiusChain,
    SmoothMap,
    SolveAResult,
    TransportMap,
    ball,
    build_bundle,
    build_guth_family,
    build_isr,
    check_contained,
    check_injective,
    check_symplectic,
    compose,
    conjugate_dilation,
    disk_to_square,
    domain_from_json,
    general0_report,
    guth_frame,
    hk_constants,
    identity_map,
    invert_local,
    knothe_map,
    map_product,
    omega,
    product,
    projection_radius_bound,
    punctured_torus,
    radius_chain,
    rect_to_disk,
    rectangle,
    solve_A,
    solve_t,
    solve_t_residual,
    square,
    symplectic_residual,
    torus_quotient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
