__version__ = '0.3.0'
_changelog = 'Added the exhaustive explorer, rule-set mutations and the exponential step scenario under B(D).'
