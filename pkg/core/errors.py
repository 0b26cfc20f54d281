from __future__ import annotations


class AfcError(Exception):
    code = "error"

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def line(self) -> str:
        return f"error: {self.code}: {self.message}"


class ContractError(AfcError):
    code = "contract"


class ModulusMismatchError(ContractError):
    code = "modulus-mismatch"


class PreconditionError(ContractError):
    code = "precondition"


class SetSpecError(ContractError):
    code = "setspec"


class ConfigError(ContractError):
    code = "config"


class InternalError(AfcError):
    # Raised when a theorem-backed construction fails; always a bug.
    code = "internal"
