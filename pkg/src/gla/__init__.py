"""Certificate-producing toolkit for the joint logic of formal
provability ([]) and explicit proofs (t : F).

Everything user-facing re-exports from here: the object language and
its parser/printer (syntax), the trusted derivation checker (kernel),
the propositional compiler (prop), the canned derivation builders and
the explicit-proof lifter (derive), relational countermodels
(semantics), and the classification of reflection generators with
verifiable certificate bundles (classify).
"""

from .syntax import (
    FALSE, And, App, Atom, Box, BoxOp, BOX_OP, Check, Const, DuplicateVariableError,
    Falsum, Formula, Generator, Impl, Neg, NotAGeneratorError, Or, ParseError,
    PrefixOp, Proves, Sum, Term, Var, VarOp, atoms, box, box_depth, constants,
    fold_prefix, is_box_only, parse_formula, parse_generator, parse_term,
    print_formula, print_generator, print_term, strip_boxes, subterms,
)
from .kernel import (
    Axiom, AxiomSchemaId, CheckReport, CheckStats, ConstantSpecification, Cs,
    Derivation, DerivationFormatError, EMPTY_CS, Hyp, Justification, Mp, Nec,
    Refl, Step, Taut, check, derivation_to_text, derivations_from_text,
    derivations_to_text, instantiate, match_axiom, match_schema, taint_flags,
    validate_cs,
)
from .prop import (
    Abstraction, NotAConsequenceError, NotATautologyError, abstract,
    compile_consequence, compile_tautology, is_tautology, subst_atoms,
)
from .derive import (
    Assembler, CertificatePair, box_mono, build_lemma2a, build_lemma2b,
    build_theorem1, build_theorem2, build_theorem6, distribute_box,
    distribute_impl, lift,
)
from .semantics import (
    KripkeModel, ModelFormatError, NotBoxOnlyError, UnknownWorldError,
    find_countermodel, forces, linear_model, make_model, model_from_text,
    model_to_text, validate_frame,
)
from .classify import (
    BOX_REFLECTION, BundleFormatError, CanonicalClass, CertificateBundle,
    OrderResult, canonicalize, certificate, compare, consistency_equivalent,
    read_bundle, verify_certificate, write_bundle,
)

__version__ = "0.1.0"
