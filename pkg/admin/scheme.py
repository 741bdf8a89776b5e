"""LevelScheme admin."""

from django.contrib import admin

from pulseman.models import LevelScheme


@admin.register(LevelScheme)
class LevelSchemeAdmin(admin.ModelAdmin):
    list_display = ["slug", "name", "dimension_display", "edge_count", "updated_at"]
    search_fields = ["slug", "name", "keywords__name"]
    readonly_fields = ["uuid", "created_at", "updated_at"]
    prepopulated_fields = {"slug": ("name",)}

    fieldsets = [
        (None, {"fields": ("slug", "name", "description", "keywords")}),
        (
            "Hamiltonian",
            {
                "fields": ("energies", "couplings"),
                "description": "Energies in energy units with hbar = 1; couplings give (H_C)_kj.",
            },
        ),
        ("Audit", {"fields": ("uuid", "created_at", "updated_at"), "classes": ("collapse",)}),
    ]

    def dimension_display(self, obj):
        return obj.dimension

    dimension_display.short_description = "N"

    def edge_count(self, obj):
        return len(obj.to_system().edges)

    edge_count.short_description = "Edges"
