"""
toriclab/core/errors.py
=======================
Hiérarchie d'exceptions du projet.

Chaque erreur porte :
    code       : identifiant stable (ex: "NOT_SURJECTIVE")
    message    : message lisible
    details    : dict de données utiles (témoins, inégalité violée, ...)
    exit_code  : contrat CLI : 1 négatif définitif, 2 entrée invalide,
                 3 plafond atteint, 4 incohérence interne

Les routers traduisent ces erreurs en HTTPException avec le même `detail`.
"""

from __future__ import annotations

from typing import Any

EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_INTERNAL = 4


class ToricLabError(Exception):
    code = "TORICLAB_ERROR"
    exit_code = EXIT_INPUT
    default_message = "Erreur toriclab."

    def __init__(self, message: str | None = None, **details: Any) -> None:
        self.message = message or self.default_message
        self.details = details
        super().__init__(self.message)

    def to_detail(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.details}


class NegativeResult(ToricLabError):
    """Réponse mathématique négative (pas une erreur de saisie)."""

    exit_code = EXIT_NEGATIVE


class CapError(ToricLabError):
    exit_code = EXIT_CAP


class InternalError(ToricLabError):
    exit_code = EXIT_INTERNAL


# ============================================================
# ENTRÉES
# ============================================================

class InputError(ToricLabError):
    code = "INVALID_INPUT"
    default_message = "Entrée invalide."


# ============================================================
# exact_lattice
# ============================================================

class ZeroVector(ToricLabError):
    code = "ZERO_VECTOR"
    default_message = "Le vecteur nul n'a pas de décomposition primitive."


class NotPrimitive(ToricLabError):
    code = "NOT_PRIMITIVE"
    default_message = "Le vecteur n'est pas primitif dans le réseau."


class NotInLattice(ToricLabError):
    code = "NOT_IN_LATTICE"
    default_message = "Le vecteur n'appartient pas au réseau."


class DimensionMismatch(ToricLabError):
    code = "DIMENSION_MISMATCH"
    default_message = "Dimensions incompatibles."


# ============================================================
# polyconv
# ============================================================

class EmptySet(ToricLabError):
    code = "EMPTY_SET"
    default_message = "La H-représentation définit un ensemble vide."


class OriginNotContained(ToricLabError):
    code = "ORIGIN_NOT_CONTAINED"
    default_message = "Le polaire n'est défini que pour un ensemble contenant 0."


class UnboundedInput(ToricLabError):
    code = "UNBOUNDED_INPUT"
    default_message = "Le polyèdre doit être compact."


class PointOutside(ToricLabError):
    code = "POINT_OUTSIDE"
    default_message = "Le point n'appartient pas au polyèdre."


class DegenerateDimension(ToricLabError):
    code = "DEGENERATE_DIMENSION"
    default_message = "Le polyèdre n'est pas de pleine dimension."


class BoxSideExceedsBound(InternalError):
    code = "BOX_SIDE_EXCEEDS_BOUND"
    default_message = "Côté de boîte > d·λ_d (bug)."


class NoInteriorLatticePoint(NegativeResult):
    code = "NO_INTERIOR_LATTICE_POINT"
    default_message = "Aucun point du réseau à l'intérieur."


class NoInteriorInteger(NegativeResult):
    code = "NO_INTERIOR_INTEGER"
    default_message = "L'intervalle ne contient aucun entier intérieur."


class AsymmetricInput(ToricLabError):
    code = "ASYMMETRIC_INPUT"
    default_message = "Le corps convexe doit être symétrique par rapport à 0."


# ============================================================
# toric_germ
# ============================================================

class NotSurjective(ToricLabError):
    code = "NOT_SURJECTIVE"
    default_message = "L'application de réseaux n'est pas surjective."


class SupportMismatch(ToricLabError):
    code = "SUPPORT_MISMATCH"
    default_message = "Le support de l'éventail diffère de π⁻¹(σ̄)."


class CoefficientRange(ToricLabError):
    code = "COEFFICIENT_RANGE"
    default_message = "Coefficient hors de [0, 1]."


class RaysDontSpan(ToricLabError):
    code = "RAYS_DONT_SPAN"
    default_message = "Les rayons n'engendrent pas N_ℝ."


class InternalDualityMismatch(InternalError):
    code = "INTERNAL_DUALITY_MISMATCH"
    default_message = "polar(□) diffère de la formule explicite de U (bug)."


class NotRCartier(ToricLabError):
    code = "NOT_R_CARTIER"
    default_message = "K+B n'est pas ℝ-Cartier sur un cône maximal."


class NotSemiample(ToricLabError):
    code = "NOT_SEMIAMPLE"
    default_message = "−K−B n'est pas f-semiample."


class RequiresSemiample(ToricLabError):
    code = "REQUIRES_SEMIAMPLE"
    default_message = "L'opération exige −K−B f-semiample."


class OutsideSupport(ToricLabError):
    code = "OUTSIDE_SUPPORT"
    default_message = "Le vecteur n'est pas dans |Δ|."


class DegenerateQuotient(NegativeResult):
    code = "DEGENERATE_QUOTIENT"
    default_message = "σ0 − σ0 = N_ℝ : (C_t) échoue pour tout t > 0."


class NonpositiveT(ToricLabError):
    code = "NONPOSITIVE_T"
    default_message = "t doit être strictement positif."


# ============================================================
# reduction
# ============================================================

class InteriorPointPresent(NegativeResult):
    code = "INTERIOR_POINT_PRESENT"
    default_message = "Le réseau rencontre int(tU)."


class NonCompact(ToricLabError):
    code = "NON_COMPACT"
    default_message = "U doit être compact (appliquer sigma0_reduce)."


class PsiDoesNotFactor(InternalError):
    code = "PSI_DOES_NOT_FACTOR"
    default_message = "ψ ne se factorise pas par Φ (bug)."


class ImageMldMismatch(InternalError):
    code = "IMAGE_MLD_MISMATCH"
    default_message = "Le germe image n'a pas le mld attendu (bug)."


class ProjectionBelowAsymmetry(InternalError):
    code = "PROJECTION_BELOW_ASYMMETRY"
    default_message = "τ < γ(Λ′, □′) au pas d'arrêt (bug)."


class NonpositiveMld(NegativeResult):
    code = "NONPOSITIVE_MLD"
    default_message = "mld_P(X, B) doit être > 0."


class NotSimplicial(ToricLabError):
    code = "NOT_SIMPLICIAL"
    default_message = "Le cône doit être simplicial."


class InvalidCertificate(ToricLabError):
    code = "INVALID_CERTIFICATE"
    default_message = "Certificat invalide."


# ============================================================
# complement
# ============================================================

class CtFails(NegativeResult):
    code = "CT_FAILS"
    default_message = "(C_t) échoue."


class ComplementMldMismatch(InternalError):
    code = "COMPLEMENT_MLD_MISMATCH"
    default_message = "Le complément construit a un mld < t (bug)."


class NotHyperstandard(ToricLabError):
    code = "NOT_HYPERSTANDARD"
    default_message = "Coefficient non r-hyperstandard."


class BaseIsPoint(ToricLabError):
    code = "BASE_IS_POINT"
    default_message = "La base est un point : utiliser global_complement."


class MldTooSmall(NegativeResult):
    code = "MLD_TOO_SMALL"
    default_message = "mld(X, B) < t."


class TOutOfRange(ToricLabError):
    code = "T_OUT_OF_RANGE"
    default_message = "t doit appartenir à (0, 1)."


# ============================================================
# oracle / plafonds
# ============================================================

class BoxTooLarge(CapError):
    code = "BOX_TOO_LARGE"
    default_message = "Boîte d'énumération au-delà du plafond de cellules."


class CapExceeded(CapError):
    code = "CAP_EXCEEDED"
    default_message = "Plafond de recherche atteint."


class CapTooSmall(CapError):
    code = "CAP_TOO_SMALL"
    default_message = "Le plafond ne contient aucun candidat : l'augmenter."
