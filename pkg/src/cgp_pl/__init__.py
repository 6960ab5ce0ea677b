"""Cartesian Genetic Programming with preferential selection of larger solutions."""

from .errors import ConfigurationError, InputError
from .genome import Chromosome, GenomeSpec, Phenotype, decode, mutate, random_chromosome
from .problems import BooleanProblem, Fitness, RegressionProblem, pagie_dataset
from .selection import RunRecord, SelectionPolicy, evolve, evolve_dynamic

__all__ = [
    "BooleanProblem",
    "Chromosome",
    "ConfigurationError",
    "Fitness",
    "GenomeSpec",
    "InputError",
    "Phenotype",
    "RegressionProblem",
    "RunRecord",
    "SelectionPolicy",
    "decode",
    "evolve",
    "evolve_dynamic",
    "mutate",
    "pagie_dataset",
    "random_chromosome",
]
