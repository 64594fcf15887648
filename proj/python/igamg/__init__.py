"""Matrix-free multigrid for tensor-product B-spline discretizations."""

try:
    from ._igamg import (
        SolveResult,
        SplineSpace,
        SplittingBasis,
        TensorOperator,
        assemble_rhs,
        build_mass_operator,
        build_operator,
        compute_splitting,
        eval_basis,
        exact_solution_error,
        kron_apply,
        make_space,
        mass_matrix,
        permute_axes,
        prolongation,
        run_record_json,
        solve,
        stiffness_matrix,
    )
except ImportError:  # in-tree use: the extension sits on PYTHONPATH, not in the package
    from _igamg import (
        SolveResult,
        SplineSpace,
        SplittingBasis,
        TensorOperator,
        assemble_rhs,
        build_mass_operator,
        build_operator,
        compute_splitting,
        eval_basis,
        exact_solution_error,
        kron_apply,
        make_space,
        mass_matrix,
        permute_axes,
        prolongation,
        run_record_json,
        solve,
        stiffness_matrix,
    )

__all__ = [
    "SolveResult",
    "SplineSpace",
    "SplittingBasis",
    "TensorOperator",
    "assemble_rhs",
    "build_mass_operator",
    "build_operator",
    "compute_splitting",
    "eval_basis",
    "exact_solution_error",
    "kron_apply",
    "make_space",
    "mass_matrix",
    "permute_axes",
    "prolongation",
    "run_record_json",
    "solve",
    "stiffness_matrix",
]
