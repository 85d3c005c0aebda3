"""Signing layer: certificate chains over the jurisdiction tree.

Reports become verifiable by signing their canonical byte encoding with a
per-jurisdiction key whose certificate is issued by the parent
jurisdiction, up to a self-signed root pinned out of band. Verification
checks the chain, revocation, the report signature, the election binding,
and sequence freshness; each failure maps to one distinct reason.
"""

from .encoding import canonical_encode, certificate_payload
from .pki import (
    Certificate,
    KeyHandle,
    Provisioned,
    TrustStore,
    issue_certificate,
    make_key,
    provision_tree,
    self_signed_root,
    wrap_channel,
)
from .schemes import DEFAULT_SCHEME, SCHEMES, Ed25519Scheme, SchnorrScheme, SignatureScheme, scheme
from .signing import (
    ForwardingMode,
    ReportBundle,
    SignedReport,
    bundle_report,
    sign_report,
    signed_report_from_text,
    signed_report_to_text,
)
from .verify import (
    ACCEPT,
    EMPTY_CRL,
    RejectReason,
    RevocationList,
    SequenceState,
    Verdict,
    verify_bundle,
    verify_report,
)

__all__ = [
    "ACCEPT",
    "Certificate",
    "DEFAULT_SCHEME",
    "EMPTY_CRL",
    "Ed25519Scheme",
    "ForwardingMode",
    "KeyHandle",
    "Provisioned",
    "RejectReason",
    "ReportBundle",
    "RevocationList",
    "SCHEMES",
    "SchnorrScheme",
    "SequenceState",
    "SignatureScheme",
    "SignedReport",
    "TrustStore",
    "Verdict",
    "bundle_report",
    "canonical_encode",
    "certificate_payload",
    "issue_certificate",
    "make_key",
    "provision_tree",
    "scheme",
    "self_signed_root",
    "sign_report",
    "signed_report_from_text",
    "signed_report_to_text",
    "verify_bundle",
    "verify_report",
    "wrap_channel",
]
