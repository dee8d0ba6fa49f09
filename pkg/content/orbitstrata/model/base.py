"""File housing exclusively the base StrataObject
"""
# ======== standard imports ========
from dataclasses import dataclass, fields, is_dataclass
from enum import EnumMeta
from fractions import Fraction
from typing import Any, Iterable, Optional, get_origin
import json
import warnings
# ==================================

# ======= third party imports ======
import numpy as np
# ==================================

# ========= program imports ========
# ==================================


def add_one_tab(tabbed_str: str):
    new_tabbed_str = tabbed_str.split('\n')
    new_tabbed_str = ['\t' + newline for newline in new_tabbed_str]
    return '\n'.join(new_tabbed_str)


@dataclass
class StrataObject:
    ''' A base data schema for orbit-space records '''

    attribute_doc_strings = None
    example = None

    def str_helper(self, depth):
        basestr = []
        nested_str = []
        for field in fields(self):
            value = getattr(self, field.name)
            if is_dataclass(value):
                nested_str.append(
                    (depth*'\t') + field.name + ':\n'
                    + add_one_tab(str(value))
                )
            elif get_origin(field.type) is list and value:
                nested_str.append(
                    (depth*'\t') + field.name + ': [\n'
                    + ('\n' + (depth*'\t')).join([add_one_tab(str(ele)) for ele in value])
                    + '\n' + (depth*'\t') + ']'
                )
            else:
                basestr.append((depth*'\t') + field.name + ': ' + str(value))
        all_str = [(depth*'\t') + self.__class__.__name__] + basestr + nested_str
        return '\n'.join(all_str)

    def __str__(self):
        return self.str_helper(depth=0)

    def validate(self):
        [getattr(self, method_name)() for method_name in dir(self)
         if method_name.startswith('validate_') and callable(getattr(self, method_name))]

    def _warncast(self, varname: str, var, intype: type, outtype: type):
        warnings.warn(f'Casting {varname} from {intype} to {outtype}.')
        return outtype(var)

    def __post_init__(self):
        self.validate()

    class StrataException(Exception):
        exit_code = 2

    class StrataUserInputException(StrataException):
        def __init__(self, parameter_name: str, message: str = '') -> None:
            self.parameter_name = parameter_name
            super().__init__(
                f'Invalid argument provided for {parameter_name}.'
                + ' ' + message
            )

    class StrataVerificationFailure(StrataException):
        exit_code = 1

    class StrataCapException(StrataException):
        exit_code = 3

    class SUITypeError(StrataUserInputException):
        def __init__(self, parameter_name: str, expected_type: Any, given_arg: Any):
            message = f'Expected {parameter_name} to have type {expected_type}, but recieved\n{given_arg!r}\n with type {type(given_arg)}.'
            super().__init__(parameter_name, message=message)

    class SUIFixedLengthError(StrataUserInputException):
        def __init__(self, parameter_name: str, expected_length: int, given_arg: Iterable):
            message = f'Expected {parameter_name} to have length {expected_length}, but recieved\n{given_arg!r}\n with length {len(given_arg)}.'
            super().__init__(parameter_name, message=message)

    class SUIChoiceError(StrataUserInputException):
        def __init__(self, parameter_name: str, permissable_choices: Iterable, given_arg: Any) -> None:
            message = f'Expected {parameter_name} to be one of {list(permissable_choices)}, but recieved\n{given_arg!r}.'
            super().__init__(parameter_name, message=message)

    class SUIBoundsError(StrataUserInputException):
        def __init__(self, parameter_name: str, min_bound: int | float | None, max_bound: int | float | None, given_arg: Any) -> None:
            message = f'Expected {parameter_name} to be within ({min_bound}, {max_bound}), but recieved\n{given_arg!r}.'
            super().__init__(parameter_name, message=message)

    @classmethod
    def check_type(cls, arg_name: str, arg: Any, desired_type: Any):
        if isinstance(arg, bool) and desired_type in (int, float, (int, float)):
            raise cls.SUITypeError(arg_name, desired_type, arg)
        if not isinstance(arg, desired_type):
            raise cls.SUITypeError(arg_name, desired_type, arg)

    @classmethod
    def check_iterable_typing(cls, arg_name: str, arg: Any, desired_inner_type: Any, fixed_length: Optional[int] = None):
        cls.check_type(arg_name, arg, Iterable)
        if fixed_length is not None and len(arg) != fixed_length:
            raise cls.SUIFixedLengthError(arg_name, fixed_length, arg)
        for i, ele in enumerate(arg):
            cls.check_type(arg_name + f'[{i}]', ele, desired_inner_type)

    @classmethod
    def check_choice_validity(cls, arg_name: str, arg: Any, permissable_choices: Iterable):
        if not (arg in permissable_choices):
            raise cls.SUIChoiceError(arg_name, permissable_choices, arg)

    @classmethod
    def check_bound(cls, arg_name: str, arg: Any,
                    min_bound: None | int | float = None,
                    max_bound: None | int | float = None):
        if (min_bound is not None and min_bound > arg) or \
           (max_bound is not None and max_bound < arg):
            raise cls.SUIBoundsError(arg_name, min_bound, max_bound, arg)

    @classmethod
    def StrataObjectFieldSerializer(cls, obj):
        if hasattr(obj, 'to_payload'):
            return obj.to_payload()
        elif isinstance(obj, dict):
            return {str(key): cls.StrataObjectFieldSerializer(value)
                    for key, value in obj.items()}
        elif isinstance(obj, (list, tuple)):
            return [cls.StrataObjectFieldSerializer(obj_item) for obj_item in obj]
        elif isinstance(type(obj), EnumMeta):
            return obj.value
        elif isinstance(obj, Fraction):
            return str(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.generic):
            return obj.item()
        return obj

    def to_payload(self) -> dict:
        return {
            field.name: self.StrataObjectFieldSerializer(getattr(self, field.name))
            for field in fields(self)}

    def to_json(self, **kwargs):
        return json.dumps(self.to_payload(), **kwargs)


StrataException = StrataObject.StrataException
StrataUserInputException = StrataObject.StrataUserInputException
StrataVerificationFailure = StrataObject.StrataVerificationFailure
StrataCapException = StrataObject.StrataCapException

