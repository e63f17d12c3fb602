"""Regularised diffusion-shock inpainting and shock filters for grey and colour images."""

from .guidance import GuidanceConfig, charbonnier_weight, sigmoid_guidance
from .image_core import ImageFormatError, load_image, load_mask, mirror_read, save_image
from .morphology import morphology_time_step_bound, upwind_dilation_magnitude, upwind_erosion_magnitude
from .params import (
    RdsParams,
    StabilityError,
    couple_parameters,
    diffusion_time_step_bound,
    homogeneous_diffusion_params,
)
from .rds_solver import inpaint, inpaint_vector, rds_step
from .report import SolverReport
from .shock_filters import ShockConfig, run_shock_filter, shock_step
from .stencils import delta_laplacian, gaussian_convolve, second_derivatives, sobel_x, sobel_y
from .structure import (
    StructureField,
    directional_second_derivative,
    dominant_eigenvector,
    joint_structure_tensor,
    structure_tensor,
)

__all__ = [
    "GuidanceConfig",
    "ImageFormatError",
    "RdsParams",
    "ShockConfig",
    "SolverReport",
    "StabilityError",
    "StructureField",
    "charbonnier_weight",
    "couple_parameters",
    "delta_laplacian",
    "diffusion_time_step_bound",
    "directional_second_derivative",
    "dominant_eigenvector",
    "gaussian_convolve",
    "homogeneous_diffusion_params",
    "inpaint",
    "inpaint_vector",
    "joint_structure_tensor",
    "morphology_time_step_bound",
    "load_image",
    "load_mask",
    "mirror_read",
    "rds_step",
    "run_shock_filter",
    "save_image",
    "second_derivatives",
    "shock_step",
    "sigmoid_guidance",
    "sobel_x",
    "sobel_y",
    "structure_tensor",
    "upwind_dilation_magnitude",
    "upwind_erosion_magnitude",
]

__version__ = "0.1.0"
