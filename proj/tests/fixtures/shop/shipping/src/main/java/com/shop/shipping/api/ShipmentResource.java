package com.shop.shipping.api;

import javax.inject.Inject;
import javax.ws.rs.*;
import com.shop.shipping.domain.Shipment;
import com.shop.shipping.service.ShippingService;

@Path("/api/shipments")
@Produces("application/json")
public class ShipmentResource {
    @Inject
    ShippingService service;

    @GET
    @Path("/{id}")
    public Shipment get(@PathParam("id") Long id) {
        return service.find(id);
    }

    @POST
    public Shipment create(Shipment shipment) {
        return service.create(shipment);
    }

    @DELETE
    @Path("/{id}")
    public void cancel(@PathParam("id") Long id) {
        service.cancel(id);
    }
}
