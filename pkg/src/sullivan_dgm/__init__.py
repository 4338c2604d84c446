"""Exact computations with semifree cdgas and dg-modules over Q."""

from .exact import (
    CochainComplexWindow, CohomologyResult, DegreeWindow, DifferentialError, EchelonBasis,
    SparseMatrix, WindowError, complex_cohomology, cohomology_window, shift_complex,
)
from .cdga import (
    AlgElement, CdgaMorphism, GradedAlgebraTable, SemifreeCdga, adjoin, augmentation,
    cdga_cohomology, cohomology_algebra, ground_field, standard_model, validate_cdga,
)
from .modules import (
    ModuleMorphism, ModuleTable, SemifreeModule, aug_ideal, augmentation_module, base_change,
    free_A_algebra, module_cohomology, shift_module, tensor_over_A, truncate_above,
    underlying_module, validate_module,
)
from .minimal import minimal_resolution, minimize, split_postnikov
from .hom import HomComplex, ext_via_hom
from .bar import BarResolution, bar_resolution, derived_tensor_tor, ext_via_bar
from .specseq import FilteredComplexWindow, compute_pages, hyper_ext_ss, minimal_ss
from .plforms import (
    Cochain, PolyForm, SimplicialOperator, apply_simplicial_map, form_d, form_wedge, integrate,
    stokes_pair,
)
from .modelfile import ModelError, load_model_file, parse_model_file, serialize

__version__ = "0.1.0"
