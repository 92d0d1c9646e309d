# services/channel_registry.py
"""
Channel Model Registry

Manages registration and discovery of the available channel families.
Each model must extend BaseChannelModel and define FAMILY_ID and FAMILY_NAME.

See docs/channels/ for detailed documentation on each family.
"""

from typing import Dict, List, Type

from models import ChannelSpec
from services.base_channel_model import BaseChannelModel
from services.error_handling import UnknownFamilyError

# Populated lazily to avoid circular imports.
AVAILABLE_MODELS: Dict[str, Type[BaseChannelModel]] = {}

# Metadata for --help and the validation report
MODEL_METADATA = {
    'ad': {
        'description': 'Relaxation of the excited population, P = exp(-Gamma t).',
        'decay_symbol': 'P',
        'closed_form_oracle': 'mu = 0 only'
    },
    'pd': {
        'description': 'Pure dephasing of the |00><11| coherence, p = exp(-gamma t).',
        'decay_symbol': 'p',
        'closed_form_oracle': 'ratio = C for every mu'
    },
    'depol': {
        'description': 'Equal-weight Pauli errors, p = exp(-gamma t).',
        'decay_symbol': 'p',
        'closed_form_oracle': 'ratio = sqrt(1 - C^2) at mu = 1'
    }
}


def register_models():
    """
    Populate the model registry.

    When adding a family:
    1. Implement it in channel_models.py
    2. Register it in AVAILABLE_MODELS
    3. Add its default rate to DEFAULT_NUMERICS_CONFIG
    4. Document it in docs/channels/
    """
    from .channel_models import AmplitudeDampingModel, DepolarizingModel, PhaseDampingModel

    for model in (AmplitudeDampingModel, PhaseDampingModel, DepolarizingModel):
        AVAILABLE_MODELS[model.FAMILY_ID] = model


def get_model_class(family) -> Type[BaseChannelModel]:
    """Get the model class registered for a family id."""
    if not AVAILABLE_MODELS:
        register_models()
    family_id = getattr(family, 'value', family)
    model = AVAILABLE_MODELS.get(family_id)
    if model is None:
        raise UnknownFamilyError(f"No channel model registered for '{family_id}'")
    return model


def get_model(spec: ChannelSpec) -> BaseChannelModel:
    """Instantiate the model for a channel specification."""
    return get_model_class(spec.family)(spec)


def get_all_models() -> List[Dict[str, str]]:
    """List all available families with their basic info."""
    if not AVAILABLE_MODELS:
        register_models()
    return [
        {
            'id': model.FAMILY_ID,
            'name': model.FAMILY_NAME,
            'description': MODEL_METADATA.get(model.FAMILY_ID, {}).get('description', '')
        }
        for model in AVAILABLE_MODELS.values()
    ]


def get_model_info(family) -> Dict[str, str]:
    """Get detailed information about a family."""
    model = get_model_class(family)
    metadata = MODEL_METADATA.get(model.FAMILY_ID, {})
    return {
        'id': model.FAMILY_ID,
        'name': model.FAMILY_NAME,
        'class': model.__name__,
        'module': model.__module__,
        'decay_symbol': metadata.get('decay_symbol', 'u'),
        'closed_form_oracle': metadata.get('closed_form_oracle', 'none'),
        'documentation': f"docs/channels/{model.FAMILY_ID}-channel.md"
    }
