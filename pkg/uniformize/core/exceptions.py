class UniformizeError(Exception):
    """Base exception for toolkit errors. `exit_code` is what the CLI returns."""

    def __init__(
        self,
        code: str,
        message: str,
        exit_code: int = 3,
        details: dict | None = None,
    ):
        self.code = code
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(message)

    def to_dict(self) -> dict:
        result = {
            "error": {
                "code": self.code,
                "message": self.message,
                "exit_code": self.exit_code,
            }
        }
        if self.details:
            result["error"]["details"] = self.details
        return result


class ConfigurationError(UniformizeError):
    def __init__(self, message: str = "Invalid configuration.", details: dict | None = None):
        super().__init__(code="invalid_config", message=message, exit_code=2, details=details)


class ContractError(UniformizeError):
    def __init__(self, message: str = "Precondition violated.", details: dict | None = None, code: str = "contract_violation"):
        super().__init__(code=code, message=message, exit_code=2, details=details)


class DomainError(ContractError):
    def __init__(self, message: str = "Domain construction failed.", details: dict | None = None):
        super().__init__(message=message, details=details, code="domain_error")


class ConvergenceError(UniformizeError):
    def __init__(self, message: str = "Iteration did not converge.", details: dict | None = None):
        super().__init__(code="no_convergence", message=message, exit_code=3, details=details)


class MonotonicityError(UniformizeError):
    def __init__(self, message: str = "Perron iterates decreased.", details: dict | None = None):
        super().__init__(
            code="monotonicity_violated",
            message=message,
            exit_code=3,
            details=details or {"suggestion": "The seed is probably not subharmonic."},
        )


class PeriodError(UniformizeError):
    def __init__(self, message: str = "Conjugate period is not a multiple of -2π.", details: dict | None = None):
        super().__init__(code="period_mismatch", message=message, exit_code=3, details=details)


class HolomorphyError(UniformizeError):
    def __init__(self, message: str = "Cauchy-Riemann residual above tolerance.", details: dict | None = None):
        super().__init__(code="not_holomorphic", message=message, exit_code=3, details=details)


class OracleError(UniformizeError):
    def __init__(self, message: str = "Oracle failed its admission check.", details: dict | None = None):
        super().__init__(code="oracle_rejected", message=message, exit_code=3, details=details)
