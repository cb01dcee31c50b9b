"""Physical constants used across the package (SI unless noted)."""

from scipy.constants import physical_constants as _pc
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import e as E_CHARGE
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import h as H_PLANCK
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_BOLTZMANN

BOHR_RADIUS = _pc["Bohr radius"][0]
BOHR_MAGNETON = _pc["Bohr magneton"][0]
RYDBERG_INF = _pc["Rydberg constant"][0]  # 1/m
ATOMIC_MASS = _pc["atomic mass constant"][0]  # kg
ELECTRON_MASS_U = _pc["electron mass in u"][0]
FINE_STRUCTURE = _pc["fine-structure constant"][0]

# 1 Hartree in joule; handy for atomic-unit conversions
HARTREE = _pc["Hartree energy"][0]

__all__ = [
    "SPEED_OF_LIGHT",
    "E_CHARGE",
    "EPS0",
    "H_PLANCK",
    "HBAR",
    "K_BOLTZMANN",
    "BOHR_RADIUS",
    "BOHR_MAGNETON",
    "RYDBERG_INF",
    "ATOMIC_MASS",
    "ELECTRON_MASS_U",
    "FINE_STRUCTURE",
    "HARTREE",
]
