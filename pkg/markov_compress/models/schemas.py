"""
Schema models for chain documents.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from markov_compress.models.chain import NumericMode, parse_numeric


class ChainDocument(BaseModel):
    """Chain document model."""
    model_config = ConfigDict(extra="forbid")

    states: List[str] = Field(min_length=1)
    targets: Dict[str, List[str]] = Field(min_length=1)
    transitions: List[Tuple[str, str, str]] = Field(default_factory=list)
    mode: Optional[NumericMode] = None

    @field_validator('states')
    def validate_states(cls, v):
        """Labels must be nonempty and unique so that transitions can refer to them."""
        seen = set()
        for label in v:
            if not label:
                raise ValueError('State labels must be nonempty')
            if label in seen:
                raise ValueError(f'Duplicate state label: {label}')
            seen.add(label)
        return v

    @field_validator('transitions')
    def validate_transitions(cls, v):
        """Validate probability literals."""
        for index, (_, _, probability) in enumerate(v):
            try:
                parse_numeric(probability)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f'Transition {index}: {e}')
        return v

    @model_validator(mode='after')
    def validate_style(self):
        """A document uses one probability style, consistent with its mode."""
        styles = {parse_numeric(p)[1] for _, _, p in self.transitions} - {None}
        if len(styles) > 1:
            raise ValueError('Document mixes "a/b" and decimal probabilities')
        if self.mode is not None and styles and styles != {self.mode}:
            raise ValueError(f'Probabilities are written as {styles.pop().value} but mode is {self.mode.value}')
        return self

    def resolved_mode(self) -> NumericMode:
        """Declared mode, else the one implied by the probability style."""
        if self.mode is not None:
            return self.mode
        styles = {parse_numeric(p)[1] for _, _, p in self.transitions} - {None}
        return styles.pop() if styles else NumericMode.EXACT
