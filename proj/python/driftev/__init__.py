"""Principal eigenvalues of -Lap + p a.grad with gradient drift."""

from ._core import (
    AsymptoticValue,
    EigenPair,
    Field2D,
    FieldSpec,
    Grid1D,
    Grid2D,
    NumericalError,
    Potential1D,
    PotentialSpec,
    TridiagPencil,
    adjoint_eigenfunction,
    assemble_pencil,
    build_field_2d,
    build_potential_1d,
    closed_form,
    decay_rate,
    detect_wells,
    detect_wells_2d,
    eigs_bisection,
    laplace_integral,
    laplace_predict,
    liouville_q,
    p2_envelope,
    principal_eig,
    product_formula,
    run_cli,
    run_sweep,
)


def lambda1(potential="power", l=1.0, p=0.0, n=4001, alpha=2.0, c=0.0):
    """Principal eigenvalue of a catalog potential on (-l, l)."""
    pot = build_potential_1d(PotentialSpec.from_id(potential, alpha, c), Grid1D(l, n))
    return principal_eig(assemble_pencil(pot, p)).lambda_


__all__ = [name for name in dir() if not name.startswith("_")]
