import orbitstrata.model
