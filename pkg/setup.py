from setuptools import setup
from stabsim.version import __version__ as v

with open('README.md') as d:
    desc = d.read()

setup(name = 'stabsim',
      version = v,
      license = 'MIT',
      packages = ['stabsim'],
      zip_safe = False,
      python_requires='>=3.8',
      description = 'Simulator and checker for self-stabilizing BFS spanning-tree algorithms',
      long_description = desc,
      long_description_content_type = 'text/markdown',
      include_package_data = True,
      package_data = {'stabsim': ['config.json', 'license.txt']},
      platforms=['Windows', 'Linux', 'OSX'],
      install_requires = [
        'networkx>=2.6',
      ],
      extras_require = {
        'test': ['pytest>=7', 'hypothesis>=6'],
      },
      entry_points = {
        'console_scripts': ['stabsim = stabsim.console:main'],
      }
)
