"""
Result types for error handling on I/O boundaries
"""
from typing import Union, Generic, TypeVar, Callable, List, Tuple
from dataclasses import dataclass

from .exceptions import PsiParityError

T = TypeVar('T')
U = TypeVar('U')
E = TypeVar('E')


@dataclass(frozen=True)
class Success(Generic[T]):
    """Represents a successful computation"""
    value: T


@dataclass(frozen=True)
class Failure(Generic[E]):
    """Represents a failed computation"""
    error: E


Result = Union[Success[T], Failure[E]]


def attempt(f: Callable[[], T]) -> "Result[T, PsiParityError]":
    """Run f, capturing toolkit errors as a Failure"""
    try:
        return Success(f())
    except PsiParityError as e:
        return Failure(e)


def flat_map(f: Callable[[T], "Result[U, E]"]) -> Callable[["Result[T, E]"], "Result[U, E]"]:
    """Monadic bind for results"""
    def binder(result: "Result[T, E]") -> "Result[U, E]":
        match result:
            case Success(value):
                return f(value)
            case Failure(error):
                return Failure(error)
    return binder


def unwrap(result: "Result[T, PsiParityError]") -> T:
    """Return the value or raise the carried toolkit error"""
    match result:
        case Success(value):
            return value
        case Failure(error):
            raise error


def partition_results(results: List["Result[T, E]"]) -> Tuple[List[T], List[E]]:
    """Separate successes and failures, keeping order"""
    successes: List[T] = []
    failures: List[E] = []
    for result in results:
        match result:
            case Success(value):
                successes.append(value)
            case Failure(error):
                failures.append(error)
    return successes, failures
