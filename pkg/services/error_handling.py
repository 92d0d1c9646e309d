"""
Error handling for the correlated-channel speed limit toolkit.

Defines the exception hierarchy raised by the numerical services and a small
service that turns an exception into a user-facing report (title, message,
suggestions, exit code) while logging the full context.
"""

import logging
import traceback
from datetime import datetime
from typing import Any, Dict, Optional


class ErrorType:
    """Constants for different error types."""
    DIMENSION_ERROR = 'dimension_error'
    NUMERIC_ERROR = 'numeric_error'
    CONTRACT_ERROR = 'contract_error'
    DOMAIN_ERROR = 'domain_error'
    SINGULAR_POINT_ERROR = 'singular_point_error'
    USAGE_ERROR = 'usage_error'
    UNKNOWN_ERROR = 'unknown_error'


class ExitCode:
    """Process exit codes used by the command line."""
    SUCCESS = 0
    FAILURE = 1
    USAGE = 2


class QslchanError(Exception):
    """Base class for all errors raised by the toolkit."""
    error_type = ErrorType.UNKNOWN_ERROR


class DimensionError(QslchanError):
    """Raised when a matrix has an unsupported or mismatched shape."""
    error_type = ErrorType.DIMENSION_ERROR


class NumericError(QslchanError):
    """Raised on non-finite input or a degenerate numeric quantity."""
    error_type = ErrorType.NUMERIC_ERROR


class ContractError(QslchanError):
    """Raised when an operation's precondition is violated."""
    error_type = ErrorType.CONTRACT_ERROR


class DomainError(QslchanError):
    """Raised when a parameter lies outside its physical domain."""
    error_type = ErrorType.DOMAIN_ERROR


class SingularPointError(QslchanError):
    """Raised when a derivative is requested at its singular point."""
    error_type = ErrorType.SINGULAR_POINT_ERROR


class UnknownFamilyError(DomainError):
    """Raised for a channel family that has no registered model."""


class UnknownFigureError(DomainError):
    """Raised for a figure id that has no dataset generator."""


class ErrorHandlingService:
    """Service for classifying errors and building user-facing reports."""

    def __init__(self):
        """Initialize the error handling service."""
        self.logger = logging.getLogger(__name__)

        # Error message templates
        self.error_messages = {
            ErrorType.DIMENSION_ERROR: {
                'title': 'Matrix Shape Error',
                'message': 'A matrix with an unsupported shape reached the kernel.',
                'suggestions': [
                    'Only 2x2 and 4x4 complex matrices are supported',
                    'Check that both operands of a product have the same shape'
                ]
            },
            ErrorType.NUMERIC_ERROR: {
                'title': 'Numeric Error',
                'message': 'A non-finite or degenerate value was encountered.',
                'suggestions': [
                    'Check the inputs for NaN or infinite entries',
                    'Move the decay parameter away from 0'
                ]
            },
            ErrorType.CONTRACT_ERROR: {
                'title': 'Contract Violation',
                'message': 'An operation was called outside its preconditions.',
                'suggestions': [
                    'Use the mixed-state bound for mixed initial states',
                    'Check Kraus completeness before applying a channel'
                ]
            },
            ErrorType.DOMAIN_ERROR: {
                'title': 'Parameter Out Of Range',
                'message': 'A parameter lies outside its allowed domain.',
                'suggestions': [
                    'alpha and mu must lie in [0, 1]',
                    'The decay endpoint must lie in (0, 1]',
                    'Rates and driving times must be positive'
                ]
            },
            ErrorType.SINGULAR_POINT_ERROR: {
                'title': 'Singular Point',
                'message': 'The requested derivative is singular at this point.',
                'suggestions': [
                    'Evaluate at a decay parameter strictly above 0',
                    'Integrate in the square-root variable near P = 0'
                ]
            }
        }

    def handle_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Handle an error with logging and a user-friendly response.

        Args:
            error: The exception that occurred
            context: Additional context about the error

        Returns:
            Dictionary with error information, suggestions and exit code
        """
        context = context or {}
        error_type = self._classify_error(error)

        # Generate unique error ID for tracking
        error_id = f"ERR_{datetime.utcnow().strftime('%Y%m%d_%H%M%S')}_{id(error) % 10000:04d}"

        self._log_error(error, error_type, error_id, context)

        template = self.error_messages.get(error_type, {
            'title': 'Unexpected Error',
            'message': 'An unexpected error occurred.',
            'suggestions': ['Rerun with --log-level DEBUG for details']
        })

        return {
            'success': False,
            'error_id': error_id,
            'error_type': error_type,
            'title': template['title'],
            'message': template['message'],
            'technical_details': str(error),
            'suggestions': template['suggestions'],
            'context': context,
            'exit_code': self.exit_code_for(error_type)
        }

    def exit_code_for(self, error_type: str) -> int:
        """Map an error type to the process exit code."""
        if error_type in (ErrorType.USAGE_ERROR, ErrorType.DOMAIN_ERROR):
            return ExitCode.USAGE
        return ExitCode.FAILURE

    def format_for_console(self, report: Dict[str, Any]) -> str:
        """Render a handled error as the lines printed on stderr."""
        lines = [f"{report['title']}: {report['technical_details']}"]
        for suggestion in report.get('suggestions', []):
            lines.append(f"  - {suggestion}")
        return "\n".join(lines)

    def _classify_error(self, error: Exception) -> str:
        """Classify an error into a specific error type."""
        if isinstance(error, QslchanError):
            return error.error_type
        elif isinstance(error, (ValueError, TypeError)):
            return ErrorType.DOMAIN_ERROR
        elif isinstance(error, (ArithmeticError, FloatingPointError)):
            return ErrorType.NUMERIC_ERROR
        else:
            return ErrorType.UNKNOWN_ERROR

    def _log_error(self, error: Exception, error_type: str, error_id: str,
                   context: Dict[str, Any]) -> None:
        """Log error with full context and traceback."""
        self.logger.error(
            f"Error {error_id} ({error_type}): {str(error)}",
            extra={
                'error_id': error_id,
                'error_type': error_type,
                'context': context,
                'traceback': traceback.format_exc()
            }
        )


# Global instance for easy access
_error_service = None


def get_error_service() -> ErrorHandlingService:
    """Get the global error handling service instance."""
    global _error_service
    if _error_service is None:
        _error_service = ErrorHandlingService()
    return _error_service
