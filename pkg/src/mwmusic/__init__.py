"""MUSIC microwave imaging from scattering matrices with unknown diagonals."""

from .forward import (ScatteringMatrix, add_noise, assemble_extended, assemble_point_targets,
                      born_coefficient, incident_field, mask)
from .music import (ImageMap, SteeringVector, SubspaceDecomposition, decompose, image_map,
                    imaging_value, project_noise, select_signal, steering)
from .oracle import oracle_map_multi, oracle_map_single, residual_sum
from .scene import (AntennaArray, Anomaly, Medium, Roi, Scene, antenna_positions, is_small_anomaly,
                    wavenumber)

__version__ = "0.1.0"
