"""Verification toolkit for Lie symmetries of third-order evolution equations
u_t = F(t,x,u,u1,u2)*u3 + G(t,x,u,u1,u2)."""

__version__ = "0.1.0"
